import time

SIGNIFICANT_CHANGE_THRESHOLD = 0.01  # 1% threshold
FIXED_WIDTH = 17
HEADERS = ["iteration", "λ", "residual", "change [%]"]


def format_cell(cell, width=FIXED_WIDTH, align="center"):
    cell_str = str(cell)
    if align == "center":
        return cell_str.center(width)
    elif align == "left":
        return cell_str.ljust(width)
    elif align == "right":
        return cell_str.rjust(width)
    else:
        return cell_str


class IterationProgressTracker:
    """
    Tracks and reports the equilibrium residual during the best-response
    iteration. Rows are printed for the first residual and whenever it
    moves by more than 1%.
    """

    def __init__(self, verbose=True):
        self.verbose = verbose
        self.reset()

    def reset(self):
        self._previous_residual = None
        self._last_residual = None
        self._last_iteration = None
        self._last_weight = None
        self._best_residual = None
        self._best_iteration = None
        self._start_time = None
        self._iteration_started = None
        self._elapsed = None
        self.iteration_times = []

    def track(self, iteration, weight, residual):
        """
        Records residual r_n of iteration n.

        Returns:
            float: The residual unchanged.
        """
        now = time.perf_counter()
        if self._iteration_started is not None:
            self.iteration_times.append(now - self._iteration_started)
        self._iteration_started = now

        row = []
        if self._previous_residual is None:
            row = [iteration, f"{weight:.4f}", f"{residual:.3e}", ""]
            self._previous_residual = residual
        elif self._previous_residual > 0:
            change = (residual - self._previous_residual) / self._previous_residual
            if abs(change) > SIGNIFICANT_CHANGE_THRESHOLD:
                arrow = "↓" if change < 0 else "↑"
                row = [iteration, f"{weight:.4f}", f"{residual:.3e}", f"{abs(change) * 100:.1f}% {arrow}"]
                self._previous_residual = residual

        if row:
            self.add_tracking_info(row)

        if self._best_residual is None or residual < self._best_residual:
            self._best_residual = residual
            self._best_iteration = iteration

        self._last_residual = residual
        self._last_iteration = iteration
        self._last_weight = weight
        return residual

    @property
    def best_residual(self):
        return self._best_residual

    @property
    def best_iteration(self):
        return self._best_iteration

    @property
    def elapsed(self):
        return self._elapsed

    def start_timer(self):
        self._start_time = time.perf_counter()
        self._iteration_started = self._start_time

    def stop_timer(self):
        self._elapsed = time.perf_counter() - self._start_time

    def mark_iteration_start(self):
        self._iteration_started = time.perf_counter()

    def _print(self, text):
        if self.verbose:
            print(text)

    def start_tracking(self, mode):
        self._print(f"🚀 Starting equilibrium search with '{mode}' damping...")
        self._print("📈 Equilibrium residual (max W₁ between successive measure flows) change:")
        self._print("╒" + "╤".join(["═" * FIXED_WIDTH for _ in HEADERS]) + "╕")
        self._print("│" + "│".join([format_cell(h, align="center") for h in HEADERS]) + "│")
        self._print("╞" + "╪".join(["═" * FIXED_WIDTH for _ in HEADERS]) + "╡")

    def add_tracking_info(self, row):
        self._print("│" + "│".join([format_cell(cell, align="center") for cell in row]) + "│")

    def finish_tracking(self, converged):
        if self._last_iteration is not None:
            self.add_tracking_info([self._last_iteration, f"{self._last_weight:.4f}",
                                    f"{self._last_residual:.3e}", ""])
        self._print("╘" + "╧".join(["═" * FIXED_WIDTH for _ in HEADERS]) + "╛")
        if self._best_residual is not None:
            self._print(f"🏆 Best residual is {self._best_residual:.3e} at iteration {self._best_iteration}")
        if converged:
            self._print("✅ Equilibrium search converged.")
        else:
            self._print("⚠️ Equilibrium search stopped before reaching the tolerance.")
