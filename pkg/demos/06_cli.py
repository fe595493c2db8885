"""Driving the command line interface from Python."""

import io
import json

from morselimits.cli import run


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue() or err.getvalue()


code, out = cli("homology", "--builtin", "appendix_z", "--ring", "Z", "--window", "-3.5", "0")
print(code, json.loads(out)["rank"])

code, out = cli("ml", "--builtin", "appendix_z", "--fixed", "0", "--grid", "-5,-4,-3,-2,-1", "--format", "text")
print(code)
print(out)

code, out = cli("novikov", "--bound", "50")
print(code, json.loads(out)["obstruction"]["max_obstruction_depth"])

# usage errors exit with 2
print(cli("homology", "--builtin", "appendix_z", "--window", "0", "-1"))
