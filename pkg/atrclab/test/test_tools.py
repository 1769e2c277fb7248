import atrclab
from atrclab.tools import raise_flags
import unittest
import warnings


class TestTools(unittest.TestCase):
    def test_install(self):
        self.assertIsNone(atrclab.install_test())

    def test_minor_flags_warn(self):
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            raise_flags(1 | 8)
        self.assertEqual(len(w), 2)
        self.assertTrue(all(issubclass(x.category, RuntimeWarning) for x in w))

    def test_major_flag_raises(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with self.assertRaises(RuntimeError):
                raise_flags(2 | 4)

    def test_no_flags(self):
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            raise_flags(0)
        self.assertEqual(len(w), 0)


if __name__ == "__main__":
    unittest.main()
