#!/usr/bin/env python3
"""Regenerates the committed sample data under data/fixtures and tests/data.

Outputs are deterministic; rerunning must not change any committed file.
"""
import datetime as dt
import hashlib
import json
import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "data" / "fixtures"
TEST_DATA = ROOT / "tests" / "data"

POSITIVE = ["rally", "beats", "strong", "upgrade", "profits", "surge", "record", "optimism", "growth", "rises"]
NEGATIVE = ["slump", "misses", "weak", "downgrade", "losses", "plunge", "concerns", "warning", "cut", "falls"]
SUBJECTS = ["ACME shares", "ACME", "Acme Corp", "the stock", "ACME management"]
FILLERS = ["analysts said", "according to a filing", "traders noted", "in early trading", "after the report"]


def weekdays(start, n):
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def fmt(x):
    return f"{x:.2f}"


def make_bars(n, seed, start, price=100.0, vol_scale=1.0, mood=None):
    """Random-walk OHLCV. `mood` (optional) adds a drift per day."""
    rng = random.Random(seed)
    rows = []
    close = price
    for i, d in enumerate(weekdays(start, n)):
        drift = 0.0004 + (0.0012 * mood[i] if mood else 0.0)
        ret = drift + rng.gauss(0, 0.012 * vol_scale)
        open_ = round(close * (1 + rng.gauss(0, 0.003 * vol_scale)), 2)
        close = round(close * math.exp(ret), 2)
        if i % 37 == 5 and rows:
            close = float(rows[-1][4])  # unchanged close
        high = round(max(open_, close) * (1 + abs(rng.gauss(0, 0.006 * vol_scale))), 2)
        low = round(min(open_, close) * (1 - abs(rng.gauss(0, 0.006 * vol_scale))), 2)
        if i % 53 == 17:
            open_ = high = low = close  # zero-range bar
        volume = int(rng.lognormvariate(13.5, 0.35))
        rows.append((d.isoformat(), fmt(open_), fmt(high), fmt(low), fmt(close), str(volume)))
    return rows


def write_bars(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("date,open,high,low,close,volume\n")
        for r in rows:
            f.write(",".join(r) + "\n")


def latent_mood(n, seed):
    rng = random.Random(seed)
    m, out = 0.0, []
    for _ in range(n):
        m = 0.985 * m + rng.gauss(0, 0.17)
        out.append(m)
    return out


def make_news(dates, mood, seed):
    rng = random.Random(seed)
    items = []
    serial = 0
    for i, d in enumerate(dates):
        count = rng.choice([0, 0, 1, 1, 1, 2, 2, 3])
        for _ in range(count):
            serial += 1
            tone = mood[i] + rng.gauss(0, 0.6)
            n_pos = max(0, round(1 + tone + rng.gauss(0, 0.5)))
            n_neg = max(0, round(1 - tone + rng.gauss(0, 0.5)))
            words = [rng.choice(POSITIVE) for _ in range(n_pos)] + [rng.choice(NEGATIVE) for _ in range(n_neg)]
            rng.shuffle(words)
            text = f"{rng.choice(SUBJECTS)} {' '.join(words) or 'steady'} {rng.choice(FILLERS)} (wire {serial})"
            minute = rng.randrange(0, 24 * 60)
            stamp = dt.datetime.combine(d, dt.time(minute // 60, minute % 60), dt.timezone.utc)
            style = serial % 5
            if style == 0:
                ts = stamp.astimezone(dt.timezone(dt.timedelta(hours=-5))).isoformat()
            elif style == 1:
                ts = stamp.strftime("%Y-%m-%dT%H:%M:%SZ")
            else:
                ts = stamp.strftime("%Y-%m-%dT%H:%MZ")
            item = {"timestamp": ts, "text": text}
            if serial % 7 == 0:
                pass  # market-wide item
            elif serial % 11 == 0:
                item["symbol"] = "OTHER"
            else:
                item["symbol"] = "ACME"
            items.append((item, tone))
    # A few weekend items; they belong to the following Monday.
    for i in range(0, len(dates) - 1, 97):
        d = dates[i]
        sat = d + dt.timedelta(days=(5 - d.weekday()) % 7)
        serial += 1
        text = f"Weekend review: ACME outlook strong despite concerns (wire {serial})"
        items.append(({"timestamp": f"{sat.isoformat()}T12:00:00Z", "text": text, "symbol": "ACME"}, 0.3))
    items.sort(key=lambda it: (it[0]["timestamp"], it[0]["text"]))
    return items


def softmax3(a, b, c):
    m = max(a, b, c)
    ea, eb, ec = math.exp(a - m), math.exp(b - m), math.exp(c - m)
    s = ea + eb + ec
    return ea / s, eb / s, ec / s


def make_scores(items, seed):
    rng = random.Random(seed)
    out = []
    for item, tone in items:
        pos, neg, _ = softmax3(1.5 * tone + rng.gauss(0, 0.3), -1.5 * tone + rng.gauss(0, 0.3), 0.4)
        pos, neg = round(pos, 6), round(neg, 6)
        neu = round(1.0 - pos - neg, 6)
        digest = hashlib.sha256(item["text"].encode("utf-8")).hexdigest()
        out.append({"hash": digest, "positive": pos, "negative": neg, "neutral": neu})
    return out


def write_jsonl(path, rows):
    with open(path, "w", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")


def alpha_vantage_payload(symbol, rows):
    series = {}
    for r in reversed(rows):
        series[r[0]] = {"1. open": f"{float(r[1]):.4f}", "2. high": f"{float(r[2]):.4f}",
                        "3. low": f"{float(r[3]):.4f}", "4. close": f"{float(r[4]):.4f}", "5. volume": r[5]}
    return {
        "Meta Data": {
            "1. Information": "Daily Prices (open, high, low, close) and Volumes",
            "2. Symbol": symbol,
            "3. Last Refreshed": rows[-1][0],
            "4. Output Size": "Compact",
            "5. Time Zone": "US/Eastern",
        },
        "Time Series (Daily)": series,
    }


def main():
    start = dt.date(2015, 1, 2)
    n = 2200
    mood = latent_mood(n, 20150102)
    bars = make_bars(n, 7, start, mood=mood)
    write_bars(FIXTURES / "ACME_daily.csv", bars)
    dates = [dt.date.fromisoformat(r[0]) for r in bars]
    news = make_news(dates, mood, 11)
    write_jsonl(FIXTURES / "ACME_news.jsonl", [it for it, _ in news])
    write_jsonl(FIXTURES / "ACME_scores.jsonl", make_scores(news, 13))
    with open(FIXTURES / "alpha_vantage_daily_ACME.json", "w", newline="\n") as f:
        json.dump(alpha_vantage_payload("ACME", bars[-100:]), f, indent=4)
        f.write("\n")
    write_bars(TEST_DATA / "bars_80.csv", make_bars(80, 80, dt.date(2021, 3, 1), price=42.0, vol_scale=2.0))


if __name__ == "__main__":
    main()
