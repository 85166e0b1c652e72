from .eft import EftTable, earliest_finish_times
from .optimal import (
    EXACT_THRESHOLD,
    Solution,
    optimal_plan,
    plan_from_rules,
    second_best_plan,
    solve,
)
from .oracle import brute_force_solve
