"""Writes the bundled synthetic meeting log: overlapping groups whose members
meet repeatedly, plus occasional large gatherings."""
import json
import random
import sys

def main(path, seed=2024, people=60, events=180):
    rng = random.Random(seed)
    labels = [f"person{i:02d}" for i in range(people)]
    groups = [labels[i:i + 12] for i in range(0, people, 8)]
    with open(path, "w", encoding="utf-8") as out:
        for t in range(events):
            if rng.random() < 0.1:
                size = rng.randint(10, 16)
                members = rng.sample(labels, size)
            else:
                group = rng.choice(groups)
                size = rng.randint(2, min(7, len(group)))
                members = rng.sample(group, size)
                if rng.random() < 0.3:
                    members.append(rng.choice(labels))
            members = sorted(set(members))
            out.write(json.dumps({"event_id": f"m{t:03d}", "time": t, "participants": members}) + "\n")

if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/meetings.jsonl")
