"""Writes the listening-test fixtures in this directory.

perception.csv      10 listeners x 24 recorded stimuli (8 per emotion)
naturalness.csv     10 listeners x 9 synthesized stimuli (3 per emotion)
intelligibility.csv 50 transcriptions with 1..5 clarity ratings

Run: python3 generate.py
"""

import csv

EMOTIONS = ["happy", "angry", "sad"]


def responses(listeners, per_emotion, wrong):
    """wrong[emotion] lists the chosen labels of the incorrect answers; they
    are spread over the (listener, stimulus) grid in order."""
    rows = []
    stimulus = 0
    for emotion in EMOTIONS:
        cells = [(l, stimulus + s) for s in range(per_emotion) for l in range(listeners)]
        misses = dict(zip(cells[:: max(1, len(cells) // max(1, len(wrong[emotion])))], wrong[emotion]))
        for l, s in cells:
            chosen = misses.get((l, s), emotion)
            rows.append((f"L{l + 1:02d}", f"{s + 1}.wav", emotion, chosen))
        stimulus += per_emotion
    rows.sort(key=lambda r: (r[0], int(r[1].split(".")[0])))
    return rows


def write(name, header, rows):
    with open(name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


header = ["listener_id", "stimulus_id", "true_emotion", "chosen_emotion"]
write("perception.csv", header, responses(10, 8, {
    "happy": ["angry"] * 4,
    "angry": ["happy", "happy", "sad"],
    "sad": ["angry"],
}))
write("naturalness.csv", header, responses(10, 3, {
    "happy": ["sad", "angry", "sad"],
    "angry": ["happy"] * 5 + ["sad"] * 3,
    "sad": ["angry"] * 8 + ["happy"] * 4,
}))

SENTENCES = [
    ("aku suka sekali", "aku suka kali"),
    ("senior amat cantik", "senior adat cantik"),
    ("kamu diam saja", "kamu dia saja"),
    ("pergi kalian berdua", "pergi kalian dua"),
    ("hilang hadiah itu", "hilang hari itu"),
    ("lupakan saja aku", "lupakan saya aku"),
]
# ratings: six 5s, eleven 4s, twenty 3s, ten 2s, three 1s
RATINGS = [5] * 6 + [4] * 11 + [3] * 20 + [2] * 10 + [1] * 3
rows = []
for i, rating in enumerate(RATINGS):
    reference, misheard = SENTENCES[i % len(SENTENCES)]
    # every fifth transcription has one wrong word
    transcript = misheard if i % 5 == 4 else reference.capitalize() + "."
    rows.append((f"s{i + 1:02d}", rating, reference.capitalize() + ".", transcript))
write("intelligibility.csv", ["stimulus_id", "rating", "reference", "transcript"], rows)
