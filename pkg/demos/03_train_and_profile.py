"""Train a small profiler on generated data, watch it converge, then run inference."""

from gramprof.fixtures import generate_fixture_corpus
from gramprof.profiler import Profiler
from gramprof.trainer import TrainConfig, evaluate, save_checkpoint, train

train_sents = generate_fixture_corpus(30, lang="en", seed=1)
held_sents = generate_fixture_corpus(10, lang="en", seed=2, id_prefix="held")

config = TrainConfig(
    batch_size=5,
    epochs=40,
    lr=1e-3,
    d=32,
    n_layers=1,
    n_heads=4,
    d_ffn=64,
    max_len=32,
    max_span_width=8,
    min_tag_freq=1,
    multitask=True,  # difficulty head trained jointly with the span classifier
    seed=0,
)


def progress(epoch, model, report):
    if epoch % 10 == 0 or epoch == 1:
        print(f"  epoch {epoch:3d}  F1 {report.labeled.f1:.3f}  level acc {report.level_accuracy:.3f}")


print(f"training on {len(train_sents)} sentences")
ckpt = train(config, train_sents, train_sents, epoch_hook=progress)
print(f"best epoch {ckpt.provenance['best_epoch']} "
      f"(validation F1 {ckpt.provenance['val_labeled_f1']:.3f})")

held = evaluate(ckpt.build_model(), ckpt.vocab, held_sents)
print(f"held-out: labeled F1 {held.labeled.f1:.3f}, unlabeled {held.unlabeled.f1:.3f}, "
      f"level acc {held.level_accuracy:.3f}")
print("per tag:")
for tag, row in held.per_tag.items():
    print(f"  {tag:<8} p={row['p']:.2f} r={row['r']:.2f} f1={row['f1']:.2f} (gold {row['gold_count']})")

save_checkpoint(ckpt, "/tmp/demo_model")
profiler = Profiler.from_dir("/tmp/demo_model")

text = "I am walking in the park now. He saw the dog."
print(f"\nprofiling: {text!r}")
for pred in profiler.profile_text(text, "en"):
    name, prob = pred.level
    print(f"{pred.id}  [{name} {prob:.2f}]  {pred.text}")
    for s in pred.spans:
        print(f"  ({s.start},{s.end}) {s.tag:<8} {s.prob:.3f}  {text[s.char_start:s.char_end]!r}")
