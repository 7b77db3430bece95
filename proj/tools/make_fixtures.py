#!/usr/bin/env python3
"""Regenerate the 12-player fixtures in data/ from the published serve table.

stats12.csv holds the published probabilities verbatim. counts12.csv turns
them into integer tallies with the published number of service points, so
the frequencies match the table up to rounding. Match counts are not
published; every player gets 20, the charting floor used for selection.
"""
import csv
import pathlib

# name, points (thousands), x1, x2, f1, f2, k1, k2
ROWS = [
    ("Novak Djokovic", 44.8, .649, .920, .341, .168, .392, .420),
    ("Rafael Nadal", 34.0, .686, .926, .276, .161, .429, .434),
    ("Roger Federer", 58.0, .618, .943, .415, .192, .354, .390),
    ("Pete Sampras", 20.3, .565, .897, .536, .215, .267, .342),
    ("Boris Becker", 15.7, .550, .882, .477, .195, .295, .329),
    ("Carlos Alcaraz", 16.5, .646, .909, .320, .178, .400, .420),
    ("Jannik Sinner", 20.1, .603, .933, .384, .170, .374, .422),
    ("Ivo Karlovic", 3.6, .654, .863, .570, .310, .238, .288),
    ("John Isner", 7.9, .695, .919, .541, .264, .235, .321),
    ("Reilly Opelka", 4.4, .656, .919, .550, .260, .224, .338),
    ("David Ferrer", 6.0, .617, .913, .240, .132, .402, .389),
    ("Diego Schwartzman", 3.9, .639, .896, .216, .143, .420, .412),
]

out = pathlib.Path(__file__).resolve().parent.parent / "data"

with open(out / "stats12.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["player_id", "x1", "x2", "f1", "f2", "k1", "k2"])
    for name, _, *p in sorted(ROWS):
        w.writerow([name, *p])

with open(out / "counts12.csv", "w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["player_id", "n_matches", "N", "n_x1", "n_x2", "n_f1", "n_f2", "n_k1", "n_k2"])
    for name, nk, x1, x2, f1, f2, k1, k2 in sorted(ROWS):
        n = round(nk * 1000)
        nx1 = round(x1 * n)
        nx2 = round(x2 * (n - nx1))
        w.writerow([name, 20, n, nx1, nx2, round(f1 * nx1), round(f2 * nx2),
                    round(k1 * nx1), round(k2 * nx2)])
