import asciichartpy
import numpy as np

DEFAULT_HEIGHT = 9
DEFAULT_COLORS = {
    'residual': asciichartpy.green,
    'distance': asciichartpy.blue,
    'bound': asciichartpy.red,
    'tolerance': asciichartpy.yellow,
}


class ChartPlotter:
    """Console line charts for residual histories and distance decays."""

    def __init__(self, height=DEFAULT_HEIGHT):
        self.height = height

    def plot(self, y_values_list, x_values=None, x_min=None, x_max=None, title='', labels=None, log_scale=False):
        """
        Plot one or more series against a shared x axis.

        Non-finite values are dropped point-wise from every series so that
        an infinite bound does not flatten the chart. With `log_scale` the
        series are plotted as log10 of their positive values.
        """
        if not isinstance(y_values_list, list) or not isinstance(y_values_list[0], (list, tuple, np.ndarray)):
            y_values_list = [y_values_list]

        y_values_list = [np.asarray(series, dtype=float) for series in y_values_list]
        n_points = len(y_values_list[0])

        x_values = np.arange(n_points) if x_values is None else np.asarray(x_values, dtype=float)
        for series in y_values_list:
            if len(series) != len(x_values):
                raise ValueError(f"x_values and y_values must be the same length. x: {len(x_values)}, y: {len(series)}")

        mask = np.ones(n_points, dtype=bool)
        if x_min is not None:
            mask &= x_values >= x_min
        if x_max is not None:
            mask &= x_values <= x_max
        for series in y_values_list:
            mask &= np.isfinite(series)
            if log_scale:
                mask &= series > 0
        if not np.any(mask):
            raise ValueError("No finite data points to plot in the selected range.")

        x_filtered = x_values[mask]
        filtered_series = []
        for series in y_values_list:
            values = series[mask]
            if log_scale:
                values = np.log10(values)
            filtered_series.append(values.tolist())

        colors = [DEFAULT_COLORS.get(label) for label in labels] if labels else []
        config = {
            'height': self.height,
            'colors': [color for color in colors if color is not None],
        }
        chart = asciichartpy.plot(filtered_series, config)

        print(f"{title}")
        scale_note = " (log10 scale)" if log_scale else ""
        print(f"Displaying data from x = {x_filtered[0]:g} to {x_filtered[-1]:g} ({int(np.sum(mask))} data points){scale_note}")

        if labels:
            legend_str = " | ".join([
                f"{DEFAULT_COLORS.get(label, '')}────{asciichartpy.reset} {label.capitalize()}"
                for label in labels
            ])
            print(f"Legend: {legend_str}")

        print(chart)
