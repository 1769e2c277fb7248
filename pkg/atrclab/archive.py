import csv

import numpy as np

from .oracle import DistTable


class Tablearchive(object):
    """
    Tablearchive Class.

    Reads back a distribution table written by DistTable.to_csv. Keys are the "|"-joined
    bitstrings of DistTable.key (lowest bit first), or plain integers for integer columns.
    """
    def __init__(self, filename, columns=None, widths=None):
        """
        Arguments
        ---------
        filename : str
            Filename of the CSV file to be opened.
        columns : sequence of str, optional
            Component names of the rebuilt table.
        widths : sequence of int or None, optional
            Bit widths per component; inferred when omitted (a component is read as bits when
            every entry is a 0/1 string of one common length).
        """
        self.filename = filename
        self.columns = columns
        self.widths = widths
        with open(filename, newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            if header != ["key", "probability"]:
                raise ValueError("ATRC Error: {0} is not a table file.".format(filename))
            self.rows = [(key, float(p)) for key, p in reader]

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, key):
        return self.rows[key]

    def table(self):
        """The archived table as a DistTable."""
        if not self.rows:
            raise ValueError("ATRC Error: {0} holds no states.".format(self.filename))
        parts = [key.split("|") for key, _ in self.rows]
        widths = self.widths
        if widths is None:
            widths = []
            for j in range(len(parts[0])):
                column = [row[j] for row in parts]
                lengths = set(len(x) for x in column)
                is_bits = len(lengths) == 1 and all(set(x) <= set("01") for x in column)
                widths.append(lengths.pop() if is_bits else None)
        states = []
        for row in parts:
            states.append([int(p[::-1], 2) if w is not None else int(p) for p, w in zip(row, widths)])
        probs = np.array([p for _, p in self.rows])
        return DistTable(np.array(states, dtype=np.int64), probs, 0., self.columns, widths)


def write_rows(path, header, rows):
    """CSV with floats at 17 significant digits; rows are written in the given order."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(x) for x in row] for row in rows)


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return "{0:.17g}".format(float(x))
    if x is None:
        return ""
    return str(x)


def read_rows(path):
    """Rows of a CSV written by write_rows as dicts of strings."""
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
