MODULE_NAME = "chainladder"

MIN_MACK_ORIGINS = 3

SUMMARY_FIELDS = ("CL Reserve", "CL StdError", "Reserve+SE", "Reserve+2SE", "CV")
