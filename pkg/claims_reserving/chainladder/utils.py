from claims_reserving.chainladder.constants import MODULE_NAME
from claims_reserving.reserving_log import create_log


def create_chainladder_log(**kwargs):
    return create_log(module_def=MODULE_NAME, **kwargs)
