import os

import pytest

from converter import ConvertError, plot_results

K_CSV = """k,family,acc
2,chebyshev,0.775
10,chebyshev,0.648
2,laguerre,0.771
10,laguerre,0.778
2,meixner,0.770
10,meixner,0.760
2,krawtchouk,0.768
10,krawtchouk,0.755
"""


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
    return str(path)


class TestPlotResults:
    def test_four_family_chart(self, tmp_path):
        csv = write(tmp_path / "k_ablation.csv", K_CSV)
        out = str(tmp_path / "chart.png")
        assert plot_results(csv, out) == 4
        assert os.path.getsize(out) > 0

    def test_missing_csv(self, tmp_path):
        with pytest.raises(ConvertError, match="missing file"):
            plot_results(str(tmp_path / "nope.csv"), str(tmp_path / "o.png"))

    def test_single_row(self, tmp_path):
        csv = write(tmp_path / "one.csv", "h,family,acc\n16,laguerre,0.9\n")
        out = str(tmp_path / "chart.png")
        assert plot_results(csv, out) == 1
        assert os.path.isfile(out)

    def test_bad_header(self, tmp_path):
        csv = write(tmp_path / "bad.csv", "a,b\n1,2\n")
        with pytest.raises(ConvertError, match="header"):
            plot_results(csv, str(tmp_path / "o.png"))
