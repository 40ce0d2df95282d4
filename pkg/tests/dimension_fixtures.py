"""Real dimensions (dim P, dim K) read off the block forms of every catalog row.

Counted by hand from the block forms of each entry, as functions of the
ambient size N; m = N/2, r = N/4.
"""


def _m(n):
    return n // 2


def _r(n):
    return n // 4


def _sq(n):
    return (n * n, n * n)


def _plus19(n):
    m = _m(n)
    return (2 * m * m + m, 2 * m * m - m)


def _minus19(n):
    m = _m(n)
    return (2 * m * m - m, 2 * m * m - m)


def _m2(n):
    m = _m(n)
    return (2 * m * m, 2 * m * m)


DIMENSIONS = {
    "1": lambda n: (2 * n * n, 2 * n * n),
    "2": _sq, "5": _sq, "6": _sq, "7": _sq, "8": _sq,
    "3(+)": lambda n: (n * (n + 1), n * (n - 1)),
    "3(-)": lambda n: (n * (n - 1), n * (n - 1)),
    "4(+)": lambda n: (n * (n - 1), n * (n + 1)),
    "4(-)": lambda n: (n * (n + 1), n * (n + 1)),
    "9(+)": lambda n: (2 * _m(n) ** 2, 2 * _m(n) * (_m(n) - 1)),
    "9(-)": lambda n: (2 * _m(n) ** 2, 2 * _m(n) * (_m(n) - 1)),
    "10(+)": lambda n: (8 * _r(n) ** 2, 4 * _r(n) * (2 * _r(n) + 1)),
    "10(-)": lambda n: (8 * _r(n) ** 2, 4 * _r(n) * (2 * _r(n) + 1)),
    "11(+)": lambda n: (2 * _m(n) * (_m(n) + 1), 2 * _m(n) ** 2),
    "11(-)": lambda n: (2 * _m(n) * (_m(n) - 1), 2 * _m(n) ** 2),
    "12(+)": _m2, "12(-)": _m2, "13": _m2, "14(+)": _m2, "14(-)": _m2, "15": _m2,
    "16(+)": _m2, "16(-)": _m2,
    "17(+)": lambda n: (n * (n + 1) // 2, n * (n - 1) // 2),
    "17(-)": lambda n: (n * (n - 1) // 2, n * (n - 1) // 2),
    "18a": lambda n: (_m(n) * (2 * _m(n) - 1), _m(n) * (2 * _m(n) + 1)),
    "18b(+)": lambda n: (_m(n) * (2 * _m(n) - 1), _m(n) * (2 * _m(n) - 1)),
    "18b(-)": lambda n: (_m(n) * (2 * _m(n) + 1), _m(n) * (2 * _m(n) + 1)),
    "19(+)": _plus19, "19'(+)": _plus19, "19+": _plus19, "19'+": _plus19,
    "19(-)": _minus19, "19'(-)": _minus19, "19-": _minus19, "19'-": _minus19,
    "20a": lambda n: (8 * _r(n) ** 2 - 2 * _r(n), 8 * _r(n) ** 2 + 2 * _r(n)),
    "20b": lambda n: (8 * _r(n) ** 2 + 2 * _r(n), 8 * _r(n) ** 2 + 2 * _r(n)),
    "21a(+)": _plus19, "21a+": _plus19,
    "21b(+)": _minus19, "21b+": _minus19,
    "21a(-)": lambda n: (2 * _m(n) ** 2 - _m(n), 2 * _m(n) ** 2 + _m(n)),
    "21a-": lambda n: (2 * _m(n) ** 2 - _m(n), 2 * _m(n) ** 2 + _m(n)),
    "21b(-)": lambda n: (2 * _m(n) ** 2 + _m(n), 2 * _m(n) ** 2 + _m(n)),
    "21b-": lambda n: (2 * _m(n) ** 2 + _m(n), 2 * _m(n) ** 2 + _m(n)),
    "22(+)": lambda n: (_m(n) ** 2, _m(n) * (_m(n) - 1)),
    "22(-)": lambda n: (_m(n) ** 2, _m(n) * (_m(n) - 1)),
    "25(+)": lambda n: (_m(n) ** 2, _m(n) * (_m(n) - 1)),
    "25(-)": lambda n: (_m(n) ** 2, _m(n) * (_m(n) - 1)),
    "23(+)": lambda n: (4 * _r(n) ** 2, 2 * _r(n) * (2 * _r(n) + 1)),
    "23(-)": lambda n: (4 * _r(n) ** 2, 2 * _r(n) * (2 * _r(n) + 1)),
    "24(+)": lambda n: (_m(n) * (_m(n) + 1), _m(n) ** 2),
    "24(-)": lambda n: (_m(n) * (_m(n) - 1), _m(n) ** 2),
    "27(+)": lambda n: (_m(n) * (_m(n) + 1), _m(n) ** 2),
    "27(-)": lambda n: (_m(n) * (_m(n) - 1), _m(n) ** 2),
    "26(+)": lambda n: (4 * _r(n) ** 2, 4 * _r(n) ** 2 + 2 * _r(n)),
    "26(-)": lambda n: (4 * _r(n) ** 2, 4 * _r(n) ** 2 + 2 * _r(n)),
    "30(+)": lambda n: (4 * _r(n) ** 2, 4 * _r(n) ** 2 + 2 * _r(n)),
    "30(-)": lambda n: (4 * _r(n) ** 2, 4 * _r(n) ** 2 + 2 * _r(n)),
    "28(+)": lambda n: (4 * _r(n) ** 2 - 2 * _r(n), 4 * _r(n) ** 2),
    "28(-)": lambda n: (4 * _r(n) ** 2 + 2 * _r(n), 4 * _r(n) ** 2),
    "29(+)": lambda n: (4 * _r(n) ** 2, 4 * _r(n) ** 2 - 2 * _r(n)),
    "29(-)": lambda n: (4 * _r(n) ** 2, 4 * _r(n) ** 2 - 2 * _r(n)),
}
