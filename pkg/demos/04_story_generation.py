"""Seed-line story generation from the classics catalog.

Loads demo_model.dtng (run demos/03_train_and_suggest.py first).

Run from the repository root:  python3 demos/04_story_generation.py
"""

import os
import sys

import nextword as nw

if not os.path.exists("demo_model.dtng"):
    sys.exit("demo_model.dtng not found - run demos/03_train_and_suggest.py first")

engine = nw.load_model("demo_model.dtng")

print("opening lines on offer:")
for title, line in engine.list_classics()[:5]:
    print(f"  {title}: {line}")
print()

seed = dict(engine.list_classics())["Moby-Dick (Herman Melville)"]
print(f"seed line: {seed!r}")
print(engine.generate(seed, 60))
print()

# Out-of-vocabulary seed words are skipped, or substituted with their
# nearest dictionary word when substitution is on; on a seed full of
# unknown words the two modes can continue completely differently.
seed = dict(engine.list_classics())["Pride and Prejudice (Jane Austen)"]
print(f"seed line: {seed!r}")
for substitute in (False, True):
    print(f"--- substitution {'on' if substitute else 'off'} ---")
    print("seed as the model sees it:", engine.processed_seed(seed, substitute))
    print(engine.generate(seed, 40, substitute=substitute))
    print()
