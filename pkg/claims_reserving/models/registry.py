from claims_reserving import hooks
from claims_reserving.controllers.recipe import RecipeController
from claims_reserving.exceptions import UnknownModelError, ValidationError
from claims_reserving.utils import get_attr


def list_models() -> list[str]:
    return list(hooks.model_recipes)


def resolve_name(name: str) -> str:
    """Registered spelling of a model name, matched case-insensitively."""
    lookup = {registered.lower(): registered for registered in hooks.model_recipes}
    try:
        return lookup[name.strip().lower()]
    except KeyError:
        raise UnknownModelError(
            f"Unknown model {name!r}; available models are {', '.join(list_models())}", model=name
        )


def get_recipe(name: str, version: str | None = None) -> RecipeController:
    """Current recipe for `name`, or the registered earlier `version` of it."""
    name = resolve_name(name)
    recipe = get_attr(hooks.model_recipes[name])()
    if version is None or str(version) == recipe.version:
        return recipe

    earlier = hooks.model_recipe_versions.get(name, {})
    if str(version) not in earlier:
        known = sorted({recipe.version, *earlier})
        raise ValidationError(
            f"{name} has no recipe version {version}; known versions are {', '.join(known)}",
            model=name,
            version=version,
        )
    return get_attr(earlier[str(version)])()
