from claims_reserving.estimation.constants import MODULE_NAME
from claims_reserving.reserving_log import create_log


def create_estimation_log(**kwargs):
    return create_log(module_def=MODULE_NAME, **kwargs)
