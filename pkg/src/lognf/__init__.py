"""Logspace normal forms for groups, on an executable space-metered transducer model."""
from .alphabet import Alphabet, free_reduce, invert, invert_word
from .errors import *  # noqa: F401,F403
from .factory import IdentityFilter, build, change_generators, normal_form
from .lang import (CosetTable, GroupExpr, format_word, parse_group, parse_word)
from .machine import (BUFFERED, METERED, END, Compose, Copier, FormalInverse, RestartableStream,
                      SpaceReport, Substitute, Transducer, Workspace, compose, equal_nf,
                      inverse_nf, run)
from .oracles import (BSMatrix, GroupElement, evaluate, free_wp_metered, oracle_equal,
                      oracle_for)

__version__ = "0.1.0"
