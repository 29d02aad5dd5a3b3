from . import __version__ as app_version

app_name = "claims_reserving"
app_title = "Claims Reserving"
app_description = "State space claims reserving with a Chain-Ladder benchmark"
app_license = "GNU GPL v3.0"

# ──────────────────────────────────────────────
# Model recipes  (name -> dotted path)
# ──────────────────────────────────────────────
model_recipes = {
    "Hertig": "claims_reserving.models.hertig.HertigRecipe",
    "CC": "claims_reserving.models.cc.CCRecipe",
    "Verrall": "claims_reserving.models.verrall.VerrallRecipe",
    "BSM": "claims_reserving.models.bsm.BSMRecipe",
}

# earlier recipe versions still accepted for saved fits (name -> version -> dotted path)
model_recipe_versions = {
    "Verrall": {"1": "claims_reserving.models.verrall.FixedRowsVerrallRecipe"},
}

# ──────────────────────────────────────────────
# Misc
# ──────────────────────────────────────────────
default_log_clearing_days = 90
