"""Simulation and optimization toolkit for a dual-band relay-aided MIMO uplink."""

from raca._core import *  # noqa: F401,F403
from raca._core import __doc__  # noqa: F401
