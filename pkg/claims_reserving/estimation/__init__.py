from claims_reserving.estimation.compare import RankedFit, Ranking, compare, ranking_report
from claims_reserving.estimation.constants import FitStatus
from claims_reserving.estimation.export import fit_report, fit_to_json
from claims_reserving.estimation.fit import FitResult, LikelihoodObjective, StartTrace, evaluate_fit, fit
