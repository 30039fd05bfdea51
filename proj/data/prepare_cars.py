#!/usr/bin/env python3
"""Rebuild data/auto_mpg.csv from the vega-datasets cars.json.

Source: `npm pack vega-datasets` -> package/data/cars.json (the classic
406-row auto-mpg table, UCI row order preserved).

That JSON has one known flaw: model years 81 and 82 are both encoded as
'1982-01-01'.  The original row order within the merged block is intact,
and the first 28 complete rows of the block belong to year 81 (anchor
names: 'plymouth reliant' opens the 81 block, 'chevrolet cavalier' opens
the 82 block; the six missing-horsepower rows split 4/2 across 81/82).
We re-split accordingly and keep the 392 rows that are complete in both
mpg and horsepower.  Origin is written with the UCI coding
(1=USA, 2=Europe, 3=Japan).

Also writes cars_design.csv next to the output: the fully numeric design
used by the CLI, with the three-level origin factor expanded into two
indicator columns (origin_usa, origin_europe; Japan is the baseline).

Usage: python3 prepare_cars.py <path-to-cars.json> [out.csv]
"""
import json, sys

ORIGIN = {"USA": 1, "Europe": 2, "Japan": 3}

def main():
    src = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else "auto_mpg.csv"
    rows = json.load(open(src))
    complete = [r for r in rows
                if r["Miles_per_Gallon"] is not None and r["Horsepower"] is not None]
    lines = ["mpg,cylinders,displacement,horsepower,weight,acceleration,model_year,origin,name"]
    design = ["mpg,cylinders,displacement,horsepower,weight,acceleration,model_year,origin_usa,origin_europe"]
    n82 = 0
    for r in complete:
        year = int(r["Year"][:4]) - 1900
        if year == 82:                 # merged 81/82 block: first 28 complete rows are 81
            n82 += 1
            year = 81 if n82 <= 28 else 82
        name = r["Name"].strip().replace(",", " ")
        org = ORIGIN[r["Origin"]]
        base = (f'{r["Miles_per_Gallon"]:g},{r["Cylinders"]:g},{r["Displacement"]:g},'
                f'{r["Horsepower"]:g},{r["Weight_in_lbs"]:g},{r["Acceleration"]:g},{year}')
        lines.append(f"{base},{org},{name}")
        design.append(f"{base},{1 if org == 1 else 0},{1 if org == 2 else 0}")
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")
    dout = out.rsplit("/", 1)[0] + "/cars_design.csv" if "/" in out else "cars_design.csv"
    with open(dout, "w") as f:
        f.write("\n".join(design) + "\n")
    print(f"wrote {out}: {len(lines)-1} rows; {dout}: {len(design)-1} rows")

if __name__ == "__main__":
    main()
