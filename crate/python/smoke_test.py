"""Smoke test for the flower Python module.

Build and install first:
    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/flower-*.whl
"""
import json
import tempfile
from pathlib import Path

import flower


def write_shop(root: Path) -> None:
    (root / "public.customer.sql").write_text("CREATE TABLE customer (id integer PRIMARY KEY, name text);\n")
    (root / "public.purchase.sql").write_text(
        "CREATE TABLE purchase (id integer PRIMARY KEY, customer_id integer, total numeric);\n"
    )
    (root / "public.customer.csv").write_text("id,name\n" + "".join(f"{i},name{i}\n" for i in range(1, 41)))
    (root / "public.purchase.csv").write_text(
        "id,customer_id,total\n" + "".join(f"{i + 1000},{i % 40 + 1},{i}.5\n" for i in range(1, 201))
    )


def main() -> None:
    assert flower.tokenize("OwnerUserId") == ["owner", "user", "id"]
    profile = flower.profile_name("customer_id")
    assert profile["budget"]["total"] >= 1

    assert flower.sample_size(10_000, 10_000, rows_min=15_000) == 10_000
    assert flower.sample_size(10**7, 10**7, rows_min=15_000, policy="calibrated") == 15_000 + int(10**7 / 15_000**0.5)

    parsed = flower.parse_ddl(
        "CREATE TABLE purchase (id int PRIMARY KEY, customer_id int REFERENCES customer(id));"
    )
    assert parsed["explicit"][0]["to"]["table"] == "customer"

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        write_shop(root)
        analysis = flower.analyze(str(root), {"seed": 3, "confidence": 0.95})
        assert "public.customer" in analysis.tables
        pairs = {(d["from"]["column"], d["to"]["table"]) for d in analysis.implicit}
        assert ("customer_id", "customer") in pairs, pairs
        assert analysis.diagram("mermaid").startswith("flowchart LR")
        assert analysis.diagram("dot").startswith("digraph erd {")
        text, size = analysis.context(["public.purchase"], hops=0)
        assert size == len(text) and "public.customer(" not in text
        report = json.loads(analysis.report_json())
        assert report["version"] == 1
        assert analysis.report_json() == flower.analyze(str(root), {"seed": 3}).report_json()

        try:
            flower.analyze(str(root), {"confidence": 1.5})
        except ValueError as e:
            assert "confidence" in str(e)
        else:
            raise AssertionError("out-of-range confidence accepted")

        gt = flower.bench_generate(json.dumps({"layout": {"kind": "stats_mimic", "scale": 0.005}, "seed": 1}), str(root / "bench"))
        assert len(gt["dependencies"]) == 12
        run = flower.analyze(str(root / "bench"))
        score = flower.bench_evaluate(run.report_json(), str(root / "bench" / "gt.json"))
        assert score["recall"] >= 11 / 12, score

    sse = flower.sample_eval(200_000, launches=2, rows_min=2_000)
    assert sse["rows_all"] == 200_000
    print("flower smoke test ok", flower.__version__)


if __name__ == "__main__":
    main()
