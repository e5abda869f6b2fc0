"""Dynamic reachability under bulk edge changes."""

from bulk_reach.core.constants import APP_VERSION

__version__ = APP_VERSION
