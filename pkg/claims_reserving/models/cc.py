from claims_reserving.controllers.recipe import ModelName
from claims_reserving.models.constants import DEFAULT_INITIAL_VARIANCE, WALK_VARIANCE_SHARE
from claims_reserving.models.hertig import HertigRecipe, lag_effects_spec
from claims_reserving.models.utils import response_cells
from claims_reserving.ssm import ParamDescriptor, ParamMap
from claims_reserving.triangle import TransformedSeries, Triangle


class CCRecipe(HertigRecipe):
    """Lag effects that drift across accident years, sharing one walk variance."""

    name = ModelName("CC")
    version = "1"
    declared_q = 2

    def param_map(self, shape: tuple[int, int], sigma2: float = DEFAULT_INITIAL_VARIANCE) -> ParamMap:
        cells = response_cells(shape, self.sequencing)
        n_dev = shape[1]

        def rule(values):
            return lag_effects_spec(cells, n_dev, values["sigma2"], values["tau2"])

        return ParamMap(
            (
                ParamDescriptor("sigma2", initial=sigma2),
                ParamDescriptor("tau2", initial=WALK_VARIANCE_SHARE * sigma2),
            ),
            rule,
        )


def build_cc(t: Triangle) -> tuple[TransformedSeries, ParamMap]:
    return CCRecipe().build(t)
