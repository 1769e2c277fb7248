import sys
if sys.version_info[:2] >= (3, 8):
    from collections.abc import MutableMapping
else:
    from collections import MutableMapping


class Params(MutableMapping):
    """
    Dictionary-style view of a parameter record (ATParams, ATRCWeights, FKParams, SixVParams).
    Keys are the record's registered field names; assignments write through to the record and
    re-run its validation.
    """
    def __init__(self, parent):
        self.verbose = 0        # set to 1 to print every assignment
        self.parent = parent    # any object with a _fields tuple of attribute names

    def _check_key(self, key):
        if key not in self.parent._fields:
            raise AttributeError("ATRC Error: Parameter '{0}' not found on {1}. Need to register it first.".format(key, type(self.parent).__name__))

    def __getitem__(self, key):
        self._check_key(key)
        return getattr(self.parent, key)

    def __setitem__(self, key, value):
        self._check_key(key)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise AttributeError("ATRC Error: Parameter '{0}' must be assigned a real number.".format(key))
        old = getattr(self.parent, key)
        setattr(self.parent, key, value)
        try:
            self.parent._check()
        except ValueError:
            setattr(self.parent, key, old)
            raise
        if self.verbose:
            print("{0}.{1} = {2:.17g}".format(type(self.parent).__name__, key, value))

    def __delitem__(self, key):
        raise AttributeError("ATRC Error: Removing parameters not implemented.")

    def __contains__(self, key):
        return key in self.parent._fields

    def __iter__(self):
        return iter(self.parent._fields)

    def __len__(self):
        return len(self.parent._fields)

    def to_text(self):
        """Flat key = value block, 17 significant digits."""
        return "".join("{0} = {1:.17g}\n".format(key, self[key]) for key in self)

    def from_text(self, text):
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            if not _:
                raise ValueError("ATRC Error: Cannot parse parameter line '{0}'.".format(line))
            self[key.strip()] = float(value)
        return self.parent
