"""Find the learning rate at which maintained cables stop sharing year 1."""
from gridhorizon.sweep import LEARNING, SweepSpec, describe, detect_threshold

spec = SweepSpec(LEARNING, range=(0.01, 0.20), base={"study": "maintenance", "args": {}},
                 width=0.005)
for t in detect_threshold(spec):
    print(f"L in ({t.lo:.4f}, {t.hi:.4f}]")
    print(f"  before: {describe(t.before)}")
    print(f"  after:  {describe(t.after)}")
