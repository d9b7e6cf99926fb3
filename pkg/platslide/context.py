import os

from oslo_config import cfg

import logging

LOG = logging.getLogger(__name__)

__all__ = [
    "get",
    "params",
    "reset",
    "set",
]

CONF_GROUP = "platslide"
ENV_PREFIX = "PLATSLIDE_"

opts = [
    cfg.IntOpt(
        "scan-workers",
        default=1,
        min=1,
        help=(
            "Maximum number of worker processes used when scanning parameter "
            "grids for admissible tuples"
        ),
    ),
    cfg.StrOpt(
        "output-format",
        default="text",
        choices=["text", "json"],
        help="Default output format of the command-line interface",
    ),
    cfg.StrOpt(
        "log-level",
        default="WARNING",
        help="Threshold of the command-line log sink",
    ),
    cfg.IntOpt(
        "max-traversal-factor",
        default=4,
        min=1,
        help=(
            "A curve traversal visiting more than this many times the number "
            "of arcs of a diagram is treated as a labelling failure"
        ),
    ),
]
option_names = [opt.dest for opt in opts]


def _default_from_env(opts, group=CONF_GROUP):
    for opt in opts:
        value = os.environ.get(f'{ENV_PREFIX}{opt.name.replace("-", "_").upper()}')
        if value:
            LOG.debug("Option %s defaulted from environment", opt.dest)
            cfg.CONF.set_default(opt.dest, value, group=group)
        else:
            cfg.CONF.clear_default(opt.dest, group=group)


def _check_key(key):
    key = key.replace("-", "_")
    if key not in option_names:
        raise cfg.NoSuchOptError(key)
    return key


def set(key, value):
    """Set a configuration parameter by name.

    Args:
        key (str): the parameter name; dashes and underscores are equivalent.
        value (any): the parameter value.

    Raises:
        cfg.NoSuchOptError: if the parameter is not supported.
    """
    cfg.CONF.set_override(_check_key(key), value, group=CONF_GROUP)


def get(key):
    """Get a configuration parameter by name.

    Args:
        key (str): the parameter name.

    Returns:
        any: the parameter value.

    Raises:
        cfg.NoSuchOptError: if the parameter is not supported.
    """
    return cfg.CONF[CONF_GROUP][_check_key(key)]


def params():
    """List all parameters known to the configuration.

    Returns:
        List[str]: a list of parameter names.
    """
    return list(cfg.CONF[CONF_GROUP].keys())


def reset():
    """Reset the configuration, removing all overrides.

    All parameters revert to their defaults, which are taken from the
    ``PLATSLIDE_<NAME>`` environment variables when those are set (for
    instance ``PLATSLIDE_SCAN_WORKERS=4``).
    """
    cfg.CONF.reset()
    _default_from_env(opts)


cfg.CONF.register_group(cfg.OptGroup(CONF_GROUP))
cfg.CONF.register_opts(opts, group=CONF_GROUP)
reset()
