from claims_reserving.ssm.constants import ParameterScale
from claims_reserving.ssm.param_map import ParamDescriptor, ParamMap, materialize
from claims_reserving.ssm.spec import (
    ComponentDef,
    SpecReport,
    SsmSpec,
    augment_regression,
    spec_to_json,
    validate,
)
