from astroid import nodes
from pylint.checkers import BaseChecker
from pylint.lint import PyLinter

_ENVIRONMENT_NAMES = {"environ", "environb", "getenv", "putenv"}


class DirectEnvironmentVariableReference(BaseChecker):
    """Runtime settings go through `thermovisco.config.Config`, never the process environment."""

    name = "direct-environment-variable-reference"
    msgs = {
        "W5002": (
            "Direct environment variable reference detected.",
            "direct-environment-variable-reference",
            "Read settings from thermovisco.config.Config (TVS_ prefixed variables), see docs/application_settings.md.",
        )
    }

    def visit_attribute(self, attribute: nodes.Attribute) -> None:
        if (
            hasattr(attribute, "expr")
            and hasattr(attribute, "attrname")
            and hasattr(attribute.expr, "name")
            and attribute.expr.name == "os"
            and attribute.attrname in _ENVIRONMENT_NAMES
        ):
            self.add_message("direct-environment-variable-reference", node=attribute)

    def visit_importfrom(self, node: nodes.ImportFrom) -> None:
        if node.modname != "os":
            return

        if any(name in _ENVIRONMENT_NAMES for name, _ in node.names):
            self.add_message("direct-environment-variable-reference", node=node)


def register(linter: "PyLinter") -> None:
    linter.register_checker(DirectEnvironmentVariableReference(linter))
