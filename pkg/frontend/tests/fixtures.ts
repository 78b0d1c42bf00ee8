// Captured verbatim from a live service run over generated fixture data:
// a checkpoint trained on 30 generated sentences plus 6 indexed documents.
// The test service replays these payloads over real HTTP.

import type { DocumentSummary, ProfileResponse, TagsResponse } from "../src/types.js";

export const TAGS: TagsResponse = {"tags": ["ADV", "NP.DEF", "PP", "PRON", "V.PAST", "V.PROG"]};

export const PROFILES: Record<string, ProfileResponse> = {
  "she was reading in the garden now .": {"sentences": [{"id": "s0", "text": "she was reading in the garden now .", "offset": 0, "tokens": [{"text": "she", "start": 0, "end": 3}, {"text": "was", "start": 4, "end": 7}, {"text": "reading", "start": 8, "end": 15}, {"text": "in", "start": 16, "end": 18}, {"text": "the", "start": 19, "end": 22}, {"text": "garden", "start": 23, "end": 29}, {"text": "now", "start": 30, "end": 33}, {"text": ".", "start": 34, "end": 35}], "spans": [{"start": 0, "end": 0, "tag": "PRON", "prob": 0.9773335456848145, "char_start": 0, "char_end": 3}, {"start": 1, "end": 2, "tag": "V.PROG", "prob": 0.8124865889549255, "char_start": 4, "char_end": 15}, {"start": 3, "end": 5, "tag": "PP", "prob": 0.9729410409927368, "char_start": 16, "char_end": 29}, {"start": 4, "end": 5, "tag": "NP.DEF", "prob": 0.9515262842178345, "char_start": 19, "char_end": 29}, {"start": 6, "end": 6, "tag": "ADV", "prob": 0.9003621935844421, "char_start": 30, "char_end": 33}], "level": {"name": "A1", "prob": 0.7643484473228455}}]},
  "he saw the dog . she was reading now .": {"sentences": [{"id": "s0", "text": "he saw the dog .", "offset": 0, "tokens": [{"text": "he", "start": 0, "end": 2}, {"text": "saw", "start": 3, "end": 6}, {"text": "the", "start": 7, "end": 10}, {"text": "dog", "start": 11, "end": 14}, {"text": ".", "start": 15, "end": 16}], "spans": [{"start": 0, "end": 0, "tag": "PRON", "prob": 0.9883158802986145, "char_start": 0, "char_end": 2}, {"start": 1, "end": 1, "tag": "V.PAST", "prob": 0.5691028833389282, "char_start": 3, "char_end": 6}, {"start": 2, "end": 3, "tag": "NP.DEF", "prob": 0.9609242081642151, "char_start": 7, "char_end": 14}], "level": {"name": "C1", "prob": 0.5645574331283569}}, {"id": "s1", "text": "she was reading now .", "offset": 17, "tokens": [{"text": "she", "start": 17, "end": 20}, {"text": "was", "start": 21, "end": 24}, {"text": "reading", "start": 25, "end": 32}, {"text": "now", "start": 33, "end": 36}, {"text": ".", "start": 37, "end": 38}], "spans": [{"start": 0, "end": 0, "tag": "PRON", "prob": 0.9751819968223572, "char_start": 17, "char_end": 20}, {"start": 1, "end": 1, "tag": "V.PAST", "prob": 0.46911728382110596, "char_start": 21, "char_end": 24}, {"start": 1, "end": 2, "tag": "V.PROG", "prob": 0.8003673553466797, "char_start": 21, "char_end": 32}, {"start": 3, "end": 3, "tag": "ADV", "prob": 0.8993750810623169, "char_start": 33, "char_end": 36}], "level": {"name": "A1", "prob": 0.7525190114974976}}]},
};

export const DOCUMENTS: DocumentSummary[] = [{"id": "doc-en-9-0003", "lang": "en", "difficulty": "A1", "gi": ["ADV", "NP.DEF", "PP", "PRON", "V.PAST", "V.PROG"], "n_sentences": 4, "snippet": "i cooked the dog today . he is playing in the park presumably . they are running the cat today . he is reading near the cat now ."}, {"id": "doc-en-9-0001", "lang": "en", "difficulty": "B1", "gi": ["ADV", "NP.DEF", "PP", "PRON", "V.PROG"], "n_sentences": 1, "snippet": "he is writing near the park often ."}, {"id": "doc-en-9-0004", "lang": "en", "difficulty": "B2", "gi": ["ADV", "NP.DEF", "PRON", "V.PAST"], "n_sentences": 1, "snippet": "you jumped the park rarely ."}, {"id": "doc-en-9-0005", "lang": "en", "difficulty": "B2", "gi": ["ADV", "NP.DEF", "PP", "PRON", "V.PAST", "V.PROG"], "n_sentences": 2, "snippet": "you jumped in the book rarely . i am running the teacher presumably ."}, {"id": "doc-en-9-0000", "lang": "en", "difficulty": "C2", "gi": ["ADV", "NP.DEF", "PP", "PRON", "V.PAST", "V.PROG"], "n_sentences": 3, "snippet": "she jumped the teacher presumably . she studied near the book presumably . we are playing certainly ."}, {"id": "doc-en-9-0002", "lang": "en", "difficulty": "C2", "gi": ["ADV", "NP.DEF", "PRON", "V.PAST", "V.PROG"], "n_sentences": 4, "snippet": "you studied presumably . she studied presumably . i am playing the park presumably . you are eating the dog presumably ."}];
