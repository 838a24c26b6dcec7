"""
Validated command-level settings of a CLI run.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

COMMANDS = ('identities', 'curvature', 'gaussbonnet', 'variation', 'solve')


class ExperimentConfig(BaseModel):
    """Command, chart, orders, resolutions, seed, tolerances and outputs."""

    command: Literal['identities', 'curvature', 'gaussbonnet', 'variation', 'solve'] = Field(
        ..., description="子命令")
    chart: str = Field('hemisphere', description="图册名称")
    n: int = Field(4, ge=2, le=8, description="维数")
    k: int = Field(2, ge=1, le=8, description="阶数")
    resolutions: List[int] = Field(default_factory=lambda: [21, 41], description="两级网格分辨率")
    seed: int = Field(0, ge=0, description="随机种子")
    samples: int = Field(1000, ge=1, description="随机样本数")
    tol: float = Field(1e-9, gt=0, description="代数恒等式容差")
    path: Literal['pos', 'lcf', 'defm', 'fixed'] = Field('pos', description="延拓路径")
    nodes: int = Field(201, ge=11, description="径向节点数")
    out: str = Field('results', description="输出目录")
    test_mode: Optional[Literal['broken-coefficient']] = Field(None, description="测试模式")
    workers: int = Field(1, ge=1, le=64, description="并发工作线程数")

    @field_validator('resolutions')
    @classmethod
    def resolutions_valid(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError('至少需要一个分辨率')
        if any(r < 5 for r in v):
            raise ValueError('每个方向的分辨率必须 >= 5')
        return sorted(v)

    @model_validator(mode='after')
    def order_within_dimension(self) -> 'ExperimentConfig':
        if self.k > self.n:
            raise ValueError(f'k={self.k} 超过维数 n={self.n}')
        return self
