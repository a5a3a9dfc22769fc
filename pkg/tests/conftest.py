import io
import sys
from datetime import datetime
from decimal import Decimal

import pytest

from basketmine.dataset import PosRecord, write_pos_csv

# best-seller table fixture (code, name, category, count, printed percent)
TABLE1 = [
    ("B0001", "Chokan Nikkan Sports Newspaper", None, 1410, "15.26"),
    ("B0002", "Coca-Cola Georgia Emerald Mountain Blend", "Beverages", 1027, "11.11"),
    ("B0003", "Nisshin Cup Noodles", "Instant Food", 495, "5.36"),
    ("B0004", "Cool Delica Temaki Onigiri Shake", "Rice Balls", 79, "0.85"),
    ("B0005", "Cool Delica Temaki Onigiri Kombu", "Rice Balls", 69, "0.75"),
    ("B0006", "Chokan Sankei Sports Newspaper", None, 64, "0.69"),
    ("B0007", "Yamazaki DY Nikuman", "Steamed Buns", 62, "0.67"),
    ("B0008", "Chokan Sports Newspaper", None, 56, "0.61"),
]
TABLE1_N = 9240
N_BRANDS = 1544


def record(rid, code, name=None, category="Misc", ts="2024-01-08T10:00", gender="F", age=30):
    return PosRecord(
        receipt_id=rid,
        timestamp=datetime.strptime(ts, "%Y-%m-%dT%H:%M"),
        gender=gender,
        age=age,
        item_code=code,
        item_name=name or f"Item {code}",
        category=category,
        quantity=1,
        unit_price=Decimal("100"),
    )


def table1_records():
    """9240 receipts where the eight Table 1 brands hit their printed counts.

    The rest of the 1544 brands are fillers spread so every receipt has at
    least one item and no filler reaches the smallest listed count.
    """
    n_fill = N_BRANDS - len(TABLE1)
    records = []
    for r in range(TABLE1_N):
        rid = f"R{r:05d}"
        for code, name, cat, count, _ in TABLE1:
            if r < count:
                records.append(record(rid, code, name, cat))
        records.append(record(rid, f"F{r % n_fill:04d}", category="Filler"))
    return records


def gender_records(n_female=8452, n_male=1548):
    out = []
    for r in range(n_female + n_male):
        out.append(record(f"G{r:05d}", "I001", gender="F" if r < n_female else "M"))
    return out


def table2_baskets():
    """N=2919, |T(A)|=6, |T(C)|=3, |T(A u C)|=3 with A="A", C="C"."""
    return [{"A", "C"}] * 3 + [{"A"}] * 3 + [{"X"}] * (2919 - 6)


def table2_records():
    """Table 2 row 1 with a virtual-item antecedent.

    Six Saturday receipts with Chokan Sports (three of them also the
    menthol box); weekday receipts carry only filler goods.
    """
    out = []
    saturday, wednesday = "2024-01-06T09:15", "2024-01-10T09:15"
    for r in range(2919):
        rid = f"T{r:05d}"
        if r < 6:
            out.append(record(rid, "CHOKAN_SPORTS", "Chokan Sports Newspaper", None, ts=saturday, gender="M", age=35))
            if r < 3:
                out.append(record(rid, "JT_FRONTIER", "JT Frontier Menthol Box", "Tobacco", ts=saturday, gender="M", age=35))
        else:
            out.append(record(rid, f"X{r % 50:02d}", ts=wednesday))
    return out


def to_csv_bytes(records):
    buf = io.StringIO()
    write_pos_csv(records, buf)
    return buf.getvalue().encode("utf-8")


@pytest.fixture
def write_corpus(tmp_path):
    def _write(records, name="corpus.csv"):
        path = tmp_path / name
        path.write_bytes(to_csv_bytes(records))
        return path
    return _write


HEADER_LINE = "receipt_id,timestamp,gender,age,item_code,item_name,category,quantity,unit_price\n"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
