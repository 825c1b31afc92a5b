"""Parse noirkg DOT output with pydot and compare edges against the facts."""
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import pydot
except ImportError:
    print("pydot not installed; skipping")
    sys.exit(77)


def run(*args):
    return subprocess.run(args, check=True, capture_output=True, text=True).stdout


def main():
    tool, fixture = sys.argv[1], Path(sys.argv[2])
    with tempfile.TemporaryDirectory() as tmp:
        graph = str(Path(tmp) / "g.kg")
        run(tool, "ingest", "--facts", str(fixture / "facts.csv"), "--ontology",
            str(fixture / "ontology.txt"), "--closure", "--reify", "--out", graph)
        facts = [l for l in run(tool, "query", "--graph", graph).splitlines()[2:] if l]

        for extra in ([], ["--suppress-temporal"]):
            text = run(tool, "export", "--graph", graph, "--dot", *extra)
            parsed = pydot.graph_from_dot_data(text)
            assert parsed and len(parsed) == 1, "DOT did not parse"
            edges = parsed[0].get_edges()
            expected = [f for f in facts if not extra or f.split(",")[1] != "occurs_at"]
            assert len(edges) == len(expected), (len(edges), len(expected))
            labels = {e.get_label().strip('"') for e in edges}
            assert ("occurs_at" in labels) == (not extra)

        sub = run(tool, "subgraph", "--graph", graph, "--character", "Weevil_Navarro", "--suppress-temporal")
        parsed = pydot.graph_from_dot_data(sub)
        edges = [(e.get_source().strip('"'), e.get_destination().strip('"'), e.get_label().strip('"'))
                 for e in parsed[0].get_edges()]
        assert edges == [("Weevil_Navarro", "lower_class", "has_financial_status")], edges
    print("dot output parsed")


if __name__ == "__main__":
    main()
