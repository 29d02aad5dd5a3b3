from claims_reserving.reserving_log import create_log
from claims_reserving.triangle.constants import MODULE_NAME


def create_triangle_log(**kwargs):
    return create_log(module_def=MODULE_NAME, **kwargs)
