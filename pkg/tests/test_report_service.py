# tests/test_report_service.py
import pytest

from app.core.exceptions import InsufficientDataError
from app.services import report_service


class TestCharts:

    def test_reruns_are_byte_identical(self, panel, tmp_path):
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        report_service.plot_calm_vs_delta(panel, 3, str(first))
        report_service.plot_calm_vs_delta(panel, 3, str(second))
        assert first.read_bytes() == second.read_bytes()
        assert b"<dc:date>" not in first.read_bytes()

    def test_mood_series(self, panel, tmp_path):
        path = tmp_path / "moods.svg"
        report_service.plot_mood_series(panel, str(path))
        assert path.read_bytes().lstrip().startswith(b"<?xml")

    def test_lag_longer_than_panel(self, panel, tmp_path):
        with pytest.raises(InsufficientDataError):
            report_service.plot_calm_vs_delta(panel.iloc[:3], 3, str(tmp_path / "x.svg"))

    def test_djia_levels(self, panel, tmp_path):
        plain, shaded = tmp_path / "plain.svg", tmp_path / "shaded.svg"
        report_service.plot_djia_levels(panel, str(plain))
        report_service.plot_djia_levels(panel, str(shaded), split_date="2008-07-01")
        assert plain.read_bytes().lstrip().startswith(b"<?xml")
        assert b"test period" in shaded.read_bytes()
        assert b"test period" not in plain.read_bytes()

    def test_djia_levels_need_rows(self, panel, tmp_path):
        with pytest.raises(InsufficientDataError):
            report_service.plot_djia_levels(panel.iloc[:0], str(tmp_path / "x.svg"))

    def test_service_renders_every_chart(self, panel, tmp_path):
        charts = report_service.ReportService(lag=2, split_date="2008-07-01").render(panel, str(tmp_path / "charts"))
        assert [path.rsplit("/", 1)[-1] for path in charts] == list(report_service.ReportService.CHARTS)
        for path in charts:
            with open(path, "rb") as handle:
                assert handle.read().lstrip().startswith(b"<?xml")
