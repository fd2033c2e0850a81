"""`symform config`: stored run settings, shown with their types and the layer they come from."""

from typing import Any

from cyclopts import App

from symform.config import FIELDS, RunConfig, check_key, coerce, get_config

config_app = App(name="config", help="Manage stored run settings")


def _scope(global_: bool) -> str:
    return "global" if global_ else "local"


def _show(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ",".join(str(item) for item in value)
    return str(value)


@config_app.command
def set(key: str, value: str, global_: bool = False) -> int:
    """Store a run setting after checking it converts to the setting's type.

    Args:
        key: Run setting name, e.g. trials or form
        value: Setting value, e.g. 500 or gk:k=2
        global_: If True, store in ~/.symform. If False, store in ./.symform.
    """
    from symform.cli import handle_errors

    def action() -> int:
        get_config(use_global=global_).set(key, value)
        print(f"Set {key} = {_show(coerce(key, value))} ({_scope(global_)})")
        return 0

    return handle_errors(action)


@config_app.command
def unset(key: str, global_: bool = False) -> int:
    """Remove a stored run setting.

    Args:
        key: Run setting name
        global_: If True, remove from ~/.symform. If False, remove from ./.symform.
    """
    from symform.cli import handle_errors

    def action() -> int:
        check_key(key)
        scope = _scope(global_)
        config = get_config(use_global=global_)
        if config.source(key) != scope:
            print(f"{key} is not stored in {scope} config")
            return 0
        config.unset(key)
        print(f"Unset {key} ({scope})")
        return 0

    return handle_errors(action)


@config_app.command
def get(key: str, global_: bool = False) -> int:
    """Show the value a run would use for a setting and where it comes from.

    Args:
        key: Run setting name
        global_: If True, read ~/.symform only. If False, read ./.symform with global fallback.
    """
    from symform.cli import handle_errors

    def action() -> int:
        check_key(key)
        config = get_config(use_global=global_)
        source = config.source(key)
        if source is None:
            print(f"{key} = {_show(getattr(RunConfig(), key))} (default)")
        else:
            print(f"{key} = {_show(coerce(key, config.get(key)))} ({source})")
        return 0

    return handle_errors(action)


@config_app.command(name="list")
def list_config(global_: bool = False) -> int:
    """List stored run settings.

    Args:
        global_: If True, list ~/.symform only. If False, list local settings over global ones.
    """
    from symform.cli import handle_errors

    def action() -> int:
        config = get_config(use_global=global_)
        settings = config.list()
        if not settings:
            print(f"No {_scope(global_)} configuration settings")
            return 0
        print(f"{'Global' if global_ else 'Stored'} settings:\n")
        for key, value in settings.items():
            check_key(key, str(config.config_file))
            print(f"{key} = {_show(coerce(key, value))} ({config.source(key)})")
        return 0

    return handle_errors(action)


@config_app.command
def keys() -> None:
    """List the accepted setting names."""
    for key in sorted(FIELDS):
        print(key)
