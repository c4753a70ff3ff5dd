"""Export the rewrite rules of a checked file for external termination and
confluence tools, in the old TPDB text format."""

from lampi.checker import Checker
from lampi.corpus import corpus_root
from lampi.tpdb import export_tpdb

for name in ["basics/sequential_plus.dk", "constructive/connectives.dk"]:
    sig = Checker().check_file(str(corpus_root() / name)).signature
    print(f"== {name}")
    print(export_tpdb(sig))
