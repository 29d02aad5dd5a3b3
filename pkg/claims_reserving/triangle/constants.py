from enum import Enum

MODULE_NAME = "triangle"

MISSING_TOKENS = frozenset({"", "nan", "na", "n/a", ".", "null", "none"})
ORIGIN_HEADER = "origin"


class TriangleKind(str, Enum):
    INCREMENTAL = "Incremental"
    CUMULATIVE = "Cumulative"


class ResponseKind(str, Enum):
    LOG_INCREMENTAL = "LogIncremental"
    LOG_CUMULATIVE = "LogCumulative"
    LOG_DEV_RATIO = "LogDevRatio"


class Sequencing(str, Enum):
    ROW_WISE = "RowWise"
    CALENDAR_YEAR = "CalendarYear"
