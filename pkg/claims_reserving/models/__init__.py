from claims_reserving.models.bsm import BSMRecipe, build_bsm
from claims_reserving.models.cc import CCRecipe, build_cc
from claims_reserving.models.hertig import HertigRecipe, build_hertig
from claims_reserving.models.registry import get_recipe, list_models, resolve_name
from claims_reserving.models.simulate import simulate_triangle, to_incremental
from claims_reserving.models.verrall import FixedRowsVerrallRecipe, VerrallRecipe, build_verrall
