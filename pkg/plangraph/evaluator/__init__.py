from .validate import PlanVerdict, Status, error_proportions, validate_plan
