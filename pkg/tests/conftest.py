import pytest

# Published yearly US connection strength with China, 1979-2013.
US_SERIES = [
    0.162, 0.174, 0.191, 0.193, 0.189, 0.189, 0.181, 0.177, 0.174, 0.169,
    0.17, 0.165, 0.162, 0.157, 0.157, 0.161, 0.17, 0.165, 0.164, 0.165,
    0.166, 0.16, 0.164, 0.16, 0.159, 0.155, 0.153, 0.151, 0.153, 0.156,
    0.162, 0.169, 0.175, 0.178, 0.179,
]
US_FITTED_2013 = 0.1798
US_OBSERVED_2013 = 0.1792


@pytest.fixture
def us_series():
    return list(US_SERIES)


@pytest.fixture
def us_train():
    return list(US_SERIES[:34])


# Orders reported for the fifteen strongest partners, and how they group.
REPORTED_ORDERS = {
    "US": (1, 1, 0), "JA": (1, 0, 0), "RS": (1, 0, 0), "KS": (0, 1, 1),
    "KN": (0, 1, 1), "UK": (1, 0, 2), "FR": (0, 1, 0), "IR": (0, 1, 0),
    "PK": (2, 0, 0), "IN": (1, 1, 0), "AS": (1, 1, 0), "VM": (1, 2, 0),
    "GM": (0, 1, 1), "RP": (0, 1, 1), "CA": (2, 1, 0),
}
CATEGORY_GROUPS = {
    "Autoregressive": {"JA", "RS", "PK"},
    "AutoregressiveIntegrated": {"US", "IN", "AS", "VM", "CA"},
    "IntegratedMovingAverage": {"KS", "KN", "GM", "RP"},
    "AutoregressiveMovingAverage": {"UK"},
    "GeneralIntegrated": {"FR", "IR"},
}


def tally(lines, target, delimiter="\t"):
    """Independent brute-force count of (year, partner) pairs in raw event rows.

    Mirrors the default layout: YYYYMMDD date in column 0, actor codes in 1 and 2.
    """
    import datetime

    counts = {}
    for line in lines:
        cells = line.rstrip("\n").split(delimiter)
        if len(cells) < 3:
            continue
        date, a, b = cells[0], cells[1].upper(), cells[2].upper()
        try:
            year = datetime.date(int(date[:4]), int(date[4:6]), int(date[6:8])).year
        except ValueError:
            continue
        if len(date) != 8 or not (len(a) == len(b) == 2 and a.isalpha() and b.isalpha()):
            continue
        if (a == target) == (b == target):
            continue
        partner = b if a == target else a
        counts.setdefault(year, {}).setdefault(partner, 0)
        counts[year][partner] += 1
    return counts
