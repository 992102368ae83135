"""Chart generation for run artifacts using Plotly."""
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from config.settings import Settings
from solver.fracops import TimeGrid
from solver.mesh import SpaceGrid

logger = logging.getLogger(__name__)


class ChartGenerator:
    """Generate figures for state slices, controls and optimization traces."""

    def __init__(self):
        self.settings = Settings()
        self.colors = self.settings.CHART_COLORS
        self.accent_colors = self.settings.ACCENT_COLORS
        self.font_size = self.settings.FONT_SIZE_LABEL
        self.font_family = self.settings.FONT_FAMILY

        self.default_layout = {
            'font': {'family': self.font_family, 'size': self.font_size, 'color': self.accent_colors['text']},
            'plot_bgcolor': self.accent_colors['surface'],
            'paper_bgcolor': self.accent_colors['background'],
            'margin': dict(l=70, r=50, t=100, b=120),
            'hovermode': 'x unified',
            'showlegend': True,
            'autosize': True,
            'legend': {
                'orientation': 'h',
                'yanchor': 'bottom',
                'y': -0.35,
                'xanchor': 'center',
                'x': 0.5,
                'font': {'size': self.font_size - 1, 'family': self.font_family},
            }
        }

    def _style(self, fig: go.Figure, title: str, x_title: str, y_title: str) -> go.Figure:
        layout = self.default_layout.copy()
        if title:
            layout['title'] = {'text': title, 'x': 0.5, 'xanchor': 'center',
                               'font': {'size': self.settings.FONT_SIZE_TITLE, 'color': self.accent_colors['text'],
                                        'family': self.font_family}}
        fig.update_layout(**layout)
        for update, text in ((fig.update_xaxes, x_title), (fig.update_yaxes, y_title)):
            update(
                showgrid=True, gridwidth=1, gridcolor=self.accent_colors['grid'],
                showline=True, linewidth=2, linecolor=self.accent_colors['border'],
                title={'text': text, 'font': {'size': self.font_size, 'family': self.font_family}},
            )
        return fig

    @staticmethod
    def slice_indices(n_times: int, count: int) -> List[int]:
        """Evenly spread time indices, always including the first and last."""
        count = max(2, min(count, n_times))
        return sorted(set(np.linspace(0, n_times - 1, count).round().astype(int).tolist()))

    def state_slices_chart(self, grid: SpaceGrid, time: TimeGrid, u: np.ndarray,
                           count: Optional[int] = None, title: str = "Temperature") -> go.Figure:
        """u(., t) at a few time slices; 2D grids show the slice through the middle row.

        Args:
            grid: Space grid
            time: Time grid
            u: State trajectory, time-major
            count: Number of slices (settings default when omitted)
            title: Chart title

        Returns:
            Plotly figure
        """
        count = count or self.settings.STATE_SLICES
        if grid.dim == 1:
            nodes = np.arange(grid.n_nodes)
        else:
            nx, ny = grid.n_cells
            nodes = np.arange(nx + 1) * (ny + 1) + ny // 2
        frames = [
            pd.DataFrame({'x': grid.coords[nodes, 0], 'u': u[n, nodes], 't': f"t = {time.nodes[n]:.3g}"})
            for n in self.slice_indices(time.n_steps + 1, count)
        ]
        df = pd.concat(frames, ignore_index=True)
        fig = px.line(df, x='x', y='u', color='t', color_discrete_sequence=px.colors.qualitative.Set2)
        return self._style(fig, title, 'x', 'u')

    def control_chart(self, grid: SpaceGrid, time: TimeGrid, beta: np.ndarray,
                      title: str = "Robin coefficient") -> go.Figure:
        """beta over time for every boundary node (at most 8 nodes drawn)."""
        fig = go.Figure()
        shown = np.unique(np.linspace(0, grid.n_boundary - 1, min(8, grid.n_boundary)).round().astype(int))
        for b in shown:
            fig.add_trace(go.Scatter(
                x=time.nodes, y=beta[:, b], mode='lines',
                name=f"node {int(grid.boundary_nodes[b])}",
            ))
        return self._style(fig, title, 't', 'beta')

    def trace_chart(self, trace: pd.DataFrame, title: str = "Cost per iteration") -> go.Figure:
        """J per iteration from a trace frame."""
        fig = go.Figure(go.Scatter(
            x=trace['iter'], y=trace['J'], mode='lines+markers',
            line={'color': self.colors['primary']}, name='J',
        ))
        return self._style(fig, title, 'iteration', 'J')

    def write(self, fig: go.Figure, path: Union[str, Path]) -> Path:
        """Write a standalone HTML file."""
        path = Path(path)
        fig.write_html(str(path), include_plotlyjs='cdn', full_html=True)
        logger.info("wrote chart %s", path)
        return path
