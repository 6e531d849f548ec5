"""Builds data/us_macro_quarterly.csv from the US macro dataset shipped with statsmodels.

Columns:
  x      100 * log real GDP (detrended by the default transform)
  pi     CPI inflation, annualized percent (400 * dlog CPI)
  i      3-month Treasury bill rate, percent
  ls     real disposable income as a percent of real GDP (income-share proxy)
  unemp  unemployment rate, percent
"""
import math
import sys

import statsmodels.api as sm


def main(path):
    d = sm.datasets.macrodata.load_pandas().data
    with open(path, "w", newline="\n") as out:
        out.write("date,x,pi,i,ls,unemp\n")
        prev_cpi = None
        for row in d.itertuples():
            date = f"{int(row.year)}Q{int(row.quarter)}"
            x = 100.0 * math.log(row.realgdp)
            pi = "NA" if prev_cpi is None else repr(400.0 * math.log(row.cpi / prev_cpi))
            ls = 100.0 * row.realdpi / row.realgdp
            out.write(f"{date},{x!r},{pi},{row.tbilrate!r},{ls!r},{row.unemp!r}\n")
            prev_cpi = row.cpi


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/us_macro_quarterly.csv")
