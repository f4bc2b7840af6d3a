# The verifier re-derives cable states from the decisions alone, so a plan
# that routes power through a cable under construction is rejected.
import copy

from gridhorizon.scenarios import learning_study
from gridhorizon.sweep import solve_instance
from gridhorizon.verify import verify

inst = learning_study(0.01)
_, plan, verdict = solve_instance(inst)
print("solved plan:", verdict.render())

year = next(d.decision_year for d in plan.decisions if d.arc == ("2", "4")) + 1
bad = copy.deepcopy(plan)
bad.flows["2", "4", 1, year] += 5.0
print(f"with 5 MW on 2-4 in Y{year}:")
print(verify(inst, bad).render())
