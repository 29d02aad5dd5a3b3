from claims_reserving.controllers.recipe import RecipeController
from claims_reserving.tests.utils import TestCase


class TestRecipeController(TestCase):
    def test_base_methods_are_abstract(self):
        recipe = RecipeController()
        with self.assertRaises(NotImplementedError):
            recipe.build(self.load_triangle("small_5x5"))
        with self.assertRaises(NotImplementedError):
            recipe.build_for_shape((5, 5))
        with self.assertRaises(NotImplementedError):
            recipe.example_state((5, 5))
