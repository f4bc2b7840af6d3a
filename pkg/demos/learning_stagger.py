"""Learning makes the three corridor restructurings stagger.

Solves the learning study at L=0 and L=1%, prints both schedules and writes
a DOT drawing of each next to this script (render with ``dot -Tsvg``).
"""
from pathlib import Path

from gridhorizon.render import render
from gridhorizon.scenarios import learning_study
from gridhorizon.sweep import solve_instance

OUT = Path(__file__).parent / "out"

for L in (0.0, 0.01):
    inst = learning_study(L)
    report, plan, verdict = solve_instance(inst)
    print(f"L={L:.2%}  objective={report.incumbent_objective:.3f}  nodes={report.nodes_explored}"
          f"  {report.wall_time:.1f}s  verifier: {verdict.render()}")
    print(render(plan, "text", inst))
    OUT.mkdir(exist_ok=True)
    (OUT / f"learning_{L:g}.dot").write_text(render(plan, "dot", inst))
