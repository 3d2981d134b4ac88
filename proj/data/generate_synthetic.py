#!/usr/bin/env python3
"""Regenerates the bundled synthetic dataset.

The files mirror the shape of a six-week options window (2020-10-08 to
2020-11-20, 30 trading days) for an AAL-like stock with a $13 call, plus a
single-expiry S&P 500 option chain for the VIX computation. Prices are made up;
they come from an independent closed-form implementation below, not from the
C++ library.

    python3 data/generate_synthetic.py
"""

import datetime as dt
import math
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
RATE = 0.0008
TRADING_DAYS = 252
BETA_AAL = 1.71
STRIKE = 13.0

# Weekdays in the window; 2020-10-12 and 2020-11-11 are left out so the
# window holds 30 sessions.
SKIPPED = {dt.date(2020, 10, 12), dt.date(2020, 11, 11)}

VIX_CLOSES = [
    26.36, 25.00, 26.07, 26.40, 26.97, 27.41, 29.18, 29.35, 28.65, 28.11,
    27.55, 32.46, 33.35, 40.28, 37.59, 38.02, 37.13, 35.55, 29.57, 27.58,
    24.86, 25.75, 24.80, 25.35, 23.10, 22.45, 22.71, 23.84, 23.11, 23.70,
]

BETAS = [
    ("AAL", "1.71"), ("AAPL", "1.36"), ("AMD", "2.32"), ("AMZN", "1.31"),
    ("BA", "1.41"), ("BAC", "1.57"), ("BRK-B", "0.84"), ("C", "1.82"),
    ("GS", "1.42"), ("INTC", "0.68"), ("JPM", "1.12"), ("M", "1.82"),
    ("MAR", "1.68"), ("NFLX", "0.98"), ("NKE", "0.82"), ("PFE", "0.72"),
    ("RCL", "2.76"), ("TSLA", "1.97"), ("WMT", "0.40"), ("ZM", "1.05"),
]


def trading_days():
    day = dt.date(2020, 10, 8)
    out = []
    while day <= dt.date(2020, 11, 20):
        if day.weekday() < 5 and day not in SKIPPED:
            out.append(day)
        day += dt.timedelta(days=1)
    assert len(out) == 30, len(out)
    return out


def ncdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def expanded_call(spot, strike, years, rate, s, gamma=1.0, wiener=True):
    k = s * s if wiener else 0.0
    g2s2 = (gamma * s) ** 2
    root = gamma * s * math.sqrt(years)
    d1 = (math.log(spot / strike) + (rate + g2s2 - 0.5 * k) * years) / root
    d2 = (math.log(spot / strike) + (rate - 0.5 * k) * years) / root
    return (spot * math.exp(0.5 * years * (g2s2 - k)) * ncdf(d1)
            - strike * math.exp(-rate * years) * ncdf(d2))


def cents(x):
    return round(x + 1e-12, 2)


def write_series(path, dates, values, digits=2):
    with open(path, "w") as f:
        f.write("date,value\n")
        for d, v in zip(dates, values):
            f.write(f"{d.isoformat()},{v:.{digits}f}\n")


def stock_and_option(dates):
    rng = np.random.default_rng(20201008)
    n = len(dates)
    sigmas = [BETA_AAL * v / 100.0 for v in VIX_CLOSES]
    spot = [12.61]
    for i in range(1, n):
        shock = rng.standard_normal()
        daily = sigmas[i] / math.sqrt(TRADING_DAYS)
        spot.append(spot[-1] * math.exp(-0.5 * daily * daily + daily * shock))
    spot = [cents(s) for s in spot]

    # Non-classical component injected on top of the public volatility.
    # Negative entries mark days priced below the classical model.
    excess = []
    for i in range(n):
        base = 0.30 + 0.15 * math.sin(2.0 * math.pi * i / 14.0)
        excess.append(-0.12 if i in (6, 7, 17) else base)

    option = []
    for i in range(n):
        days_left = n - i
        years = days_left / TRADING_DAYS
        remaining = sigmas[i:]
        public_var = sum(s * s for s in remaining) / days_left
        gen_var = public_var + math.copysign(excess[i] ** 2, excess[i])
        price = expanded_call(spot[i], STRIKE, years, RATE, math.sqrt(gen_var))
        option.append(max(cents(price), 0.01))
    return spot, option


def spx_chain():
    rng = np.random.default_rng(365)
    years = 30.0 / 365.0
    forward = 3497.30
    rows = []
    for strike in range(2900, 4101, 50):
        vol = 0.265 - 0.32 * math.log(strike / forward) + 0.35 * math.log(strike / forward) ** 2
        call = expanded_call(forward * math.exp(-RATE * years), strike, years, RATE, vol)
        put = call - math.exp(-RATE * years) * (forward - strike)
        spread = 0.05 * round(rng.uniform(0.0, 2.0))
        rows.append([float(strike), round(call + spread, 2), round(put + spread, 2)])
    # Q from the out-of-the-money side: puts below K0, calls above, average at K0.
    gaps = [abs(c - p) for _, c, p in rows]
    i_min = gaps.index(min(gaps))
    f_level = rows[i_min][0] + math.exp(RATE * years) * (rows[i_min][1] - rows[i_min][2])
    k0 = max(i for i, r in enumerate(rows) if r[0] <= f_level)
    for i, r in enumerate(rows):
        if i < k0:
            r.append(r[2])
        elif i > k0:
            r.append(r[1])
        else:
            r.append((r[1] + r[2]) / 2.0)
    return rows


def main():
    dates = trading_days()
    write_series(os.path.join(HERE, "vix.csv"), dates, VIX_CLOSES)
    spot, option = stock_and_option(dates)
    write_series(os.path.join(HERE, "aal_stock.csv"), dates, spot)
    write_series(os.path.join(HERE, "aal_call_13.csv"), dates, option)

    with open(os.path.join(HERE, "betas.csv"), "w") as f:
        f.write("ticker,beta\n")
        for ticker, beta in BETAS:
            f.write(f"{ticker},{beta}\n")

    with open(os.path.join(HERE, "spx_chain.csv"), "w") as f:
        f.write("strike,call_mid,put_mid,q_mid\n")
        for strike, call, put, q in spx_chain():
            f.write(f"{strike:g},{call:.2f},{put:.2f},{q:.3f}\n")


if __name__ == "__main__":
    main()
