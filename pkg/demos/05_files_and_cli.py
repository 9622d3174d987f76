"""
Network files, datasets and the command line
============================================

Networks are JSON documents and datasets are CSV files with an optional
weight column.  The same operations are available as ``latentbn``
subcommands; here they are driven through ``latentbn.cli.main``.
"""

import tempfile
from pathlib import Path

from latentbn import cli, io, make_network

net = make_network(
    {"Y": 2, "Z": 2},
    {"Y": ([], [0.2, 0.8]), "Z": (["Y"], [[0.3, 0.4], [0.7, 0.6]])},
)
workdir = Path(tempfile.mkdtemp())
(workdir / "net.json").write_text(io.serialize_network(net))
(workdir / "data.csv").write_text("Z,weight\n0,0.38\n1,0.62\n")
print((workdir / "net.json").read_text())

# %%
# Exit code 0 means a certified optimum, 3 a suboptimal parameterisation.
for sub in ("validate", "analyze"):
    cli.main([sub, "--net", str(workdir / "net.json")])
code = cli.main(["certify", "--net", str(workdir / "net.json"), "--data", str(workdir / "data.csv")])
print("certify exit code:", code)

# %%
code = cli.main(["canonicalize", "--net", str(workdir / "net.json"), "--out", str(workdir / "canon.json")])
print("canonicalize exit code:", code)
canon = io.read_network(workdir / "canon.json")
print([v.name for v in canon.variables], canon.cpts[-1].table.ravel())
