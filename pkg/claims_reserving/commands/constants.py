MODULE_NAME = "commands"

PROG_NAME = "claims-reserving"

COMPARISON_FILE = "comparison"
RESERVE_FILE = "reserve"
REFERENCE_LINES_FILE = "reference_lines.csv"
COMMON_HISTOGRAM_FILE = "histogram_common.csv"

# sidecar next to every CSV output, holding the run that produced it
META_SUFFIX = ".meta.json"
