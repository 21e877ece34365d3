"""Print every engine-versus-published comparison as a table."""
from zerohopf.findings import case_a_findings, case_b_findings

for title, records in (("Case A", case_a_findings()), ("Case B", case_b_findings())):
    print(f"\n{title}")
    for r in records:
        gap = "n/a" if r.rel_gap is None else f"{r.rel_gap:.2e}"
        print(f"  {r.name:<45} {r.verdict:<32} rel gap {gap}")
