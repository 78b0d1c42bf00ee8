"""Encoder forward/backward behavior and the precomputed-embedding file format."""

import numpy as np
import pytest

from gramprof import nn
from gramprof.encoder import (
    EMBEDDING_FILE_MAGIC,
    EmbeddingFileError,
    Encoder,
    EncoderConfig,
    load_precomputed,
    write_embedding_file,
)

F64 = np.float64


def make_encoder(seed=0, dropout=0.0, **overrides):
    cfg = EncoderConfig(
        vocab_size=overrides.pop("vocab_size", 11),
        d=overrides.pop("d", 8),
        n_layers=overrides.pop("n_layers", 2),
        n_heads=overrides.pop("n_heads", 2),
        d_ffn=overrides.pop("d_ffn", 16),
        max_len=overrides.pop("max_len", 10),
        dropout=dropout,
        **overrides,
    )
    return Encoder(cfg, nn.rng_stream(seed, "encoder"), dtype=F64)


class TestConfig:
    def test_rejects_indivisible_heads(self):
        with pytest.raises(ValueError):
            EncoderConfig(vocab_size=5, d=10, n_layers=1, n_heads=3, d_ffn=8, max_len=4)

    def test_rejects_nonpositive_sizes(self):
        with pytest.raises(ValueError):
            EncoderConfig(vocab_size=0, d=8, n_layers=1, n_heads=2, d_ffn=8, max_len=4)

    def test_rejects_unknown_activation(self):
        with pytest.raises(ValueError):
            EncoderConfig(vocab_size=5, d=8, n_layers=1, n_heads=2, d_ffn=8, max_len=4,
                          activation="swish")


class TestForward:
    def test_shapes(self):
        enc = make_encoder()
        out = enc.forward([1, 2, 3])
        assert out.hidden.shape == (3, 8)
        assert out.pooled.shape == (8,)
        assert out.all_states is None

    def test_debug_exposes_full_state(self):
        enc = make_encoder()
        out = enc.forward([1, 2, 3], debug=True)
        assert out.all_states.shape == (4, 8)  # marker row + one per token
        assert np.array_equal(out.all_states[0], out.pooled)
        assert np.array_equal(out.all_states[1:], out.hidden)

    def test_marker_never_shifts_token_rows(self):
        # hidden[i] must correspond to input token i, so span indices stay valid
        enc = make_encoder()
        a = enc.forward([4, 5])
        b = enc.forward([4, 5, 6])
        assert a.hidden.shape[0] == 2 and b.hidden.shape[0] == 3

    def test_position_sensitivity(self):
        enc = make_encoder()
        ab = enc.forward([3, 4]).hidden
        ba = enc.forward([4, 3]).hidden
        assert not np.allclose(ab[0], ba[1])

    def test_pooled_differs_from_token_states(self):
        enc = make_encoder()
        out = enc.forward([1, 2, 3])
        assert not any(np.allclose(out.pooled, h) for h in out.hidden)

    def test_deterministic_in_eval_mode(self):
        enc = make_encoder()
        a = enc.forward([1, 2, 3]).hidden
        b = enc.forward([1, 2, 3]).hidden
        assert np.array_equal(a, b)

    def test_same_seed_same_params(self):
        p1 = [p.value.copy() for p in make_encoder(seed=5).parameters()]
        p2 = [p.value.copy() for p in make_encoder(seed=5).parameters()]
        assert all(np.array_equal(a, b) for a, b in zip(p1, p2))

    def test_dropout_only_in_train_mode(self):
        enc = make_encoder(dropout=0.5)
        eval_out = enc.forward([1, 2, 3]).hidden
        eval_out2 = enc.forward([1, 2, 3]).hidden
        assert np.array_equal(eval_out, eval_out2)
        t1 = enc.forward([1, 2, 3], rng=nn.rng_stream(0, "t"), train=True).hidden
        t2 = enc.forward([1, 2, 3], rng=nn.rng_stream(1, "t"), train=True).hidden
        assert not np.array_equal(t1, t2)
        assert not np.array_equal(t1, eval_out)

    @pytest.mark.parametrize(
        "ids,msg",
        [
            ([], "non-empty"),
            ([1] * 11, "max_len"),
            ([11], "out of range"),  # the marker row is not addressable from outside
            ([-1], "out of range"),
        ],
    )
    def test_invalid_inputs_rejected(self, ids, msg):
        with pytest.raises(ValueError, match=msg):
            make_encoder().forward(ids)

    def test_max_len_sequence_accepted(self):
        out = make_encoder().forward(list(range(10)))
        assert out.hidden.shape == (10, 8)


class TestBackward:
    def test_matches_finite_differences(self):
        enc = make_encoder(n_layers=1, d=4, d_ffn=8, vocab_size=5, max_len=4)
        ids = [1, 3, 0]
        params = enc.parameters()
        rng = np.random.default_rng(0)
        wh = rng.normal(size=(3, 4))
        wp = rng.normal(size=4)

        def f(arrays):
            for p, a in zip(params, arrays):
                p.value = a
                p.grad = np.zeros_like(a)
            out = enc.forward(ids, train=True)
            enc.backward(wh, wp)
            value = float((out.hidden * wh).sum() + out.pooled @ wp)
            return value, [p.grad for p in params]

        err = nn.grad_check(f, [p.value.copy() for p in params])
        assert err < 1e-5


class TestEmbeddingFile:
    def _records(self, d=6):
        rng = np.random.default_rng(0)
        return {
            "sent-a": (rng.normal(size=(3, d)).astype(np.float32), rng.normal(size=d).astype(np.float32)),
            "sent-b": (rng.normal(size=(5, d)).astype(np.float32), rng.normal(size=d).astype(np.float32)),
        }

    def test_round_trip_exact(self, tmp_path):
        path = tmp_path / "emb.bin"
        records = self._records()
        write_embedding_file(path, 6, records)
        for sid, (hidden, pooled) in records.items():
            out = load_precomputed(path, sid)
            assert np.array_equal(out.hidden, hidden)
            assert np.array_equal(out.pooled, pooled)

    def test_later_record_found_by_seeking(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embedding_file(path, 6, self._records())
        assert load_precomputed(path, "sent-b").hidden.shape == (5, 6)

    def test_missing_id_raises(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embedding_file(path, 6, self._records())
        with pytest.raises(EmbeddingFileError, match="sent-zzz"):
            load_precomputed(path, "sent-zzz")

    def test_width_mismatch_raises(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embedding_file(path, 6, self._records())
        with pytest.raises(EmbeddingFileError, match="width"):
            load_precomputed(path, "sent-a", expected_d=8)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "emb.bin"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 16)
        with pytest.raises(EmbeddingFileError):
            load_precomputed(path, "sent-a")

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embedding_file(path, 6, self._records())
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 7])
        with pytest.raises(EmbeddingFileError, match="truncated"):
            load_precomputed(path, "sent-b")

    def test_magic_constant_starts_file(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embedding_file(path, 6, self._records())
        assert path.read_bytes().startswith(EMBEDDING_FILE_MAGIC)
