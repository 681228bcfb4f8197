"""
全局系统配置
包含算法预算、重启策略、输出目录等运行参数
"""

import os

from pydantic_settings import BaseSettings


class SystemConfig(BaseSettings):
    """系统配置类"""

    # ==================== 试验控制参数 ====================
    MAX_RESTARTS: int = 5  # 单次试验最多重启次数（重启会丢弃整个提升图）
    ROTATION_BUDGET_FACTOR: int = 50  # 每个阶段的揭示+旋转预算 = 系数 · n
    MERGE_RETRY_LIMIT: int = 50  # 阶段2 B 情形的最大重复批次
    PHASE5_CLOSE_ANY_PAIR: bool = False  # 阶段5 是否接受任意已发现端点对之间的闭合边（默认只接受当前两端之间的边）

    # ==================== 验证器参数 ====================
    BRUTEFORCE_VERTEX_CAP: int = 24  # 暴力哈密顿判定的顶点上限
    DOT_VERTEX_CAP: int = 200  # 允许导出 DOT 的最大顶点数 k·n
    ALTERNATING_BRUTEFORCE_MAX_K: int = 12  # 交错游走暴力枚举允许的最大 k

    # ==================== 实验参数 ====================
    DEFAULT_WORKERS: int = 1  # 实验默认并行进程数
    RECORD_TIMINGS: bool = True  # 是否记录各阶段耗时（关闭后报告逐字节可复现）

    # ==================== 输出配置 ====================
    OUTPUT_DIR: str = "output"
    EXPORT_DIR: str = "exports"
    FIXTURES_DIR: str = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

    # ==================== 调试配置 ====================
    ENABLE_DEBUG_MODE: bool = False  # 在每个阶段边界完整校验路径与圈

    # ==================== 监控和日志配置 ====================
    TRACELOOP_API_KEY: str = ""  # Traceloop API Key，为空时不初始化导出

    def ensure_output_dirs(self):
        """确保输出目录存在"""
        for dir_path in [self.OUTPUT_DIR, self.EXPORT_DIR]:
            os.makedirs(dir_path, exist_ok=True)

    def fixture_path(self, name: str) -> str:
        """获取内置算例文件路径，name 可以省略 .txt 后缀"""
        if not name.endswith(".txt"):
            name = f"{name}.txt"
        return os.path.join(self.FIXTURES_DIR, name)


settings = SystemConfig(_env_file=".env", _env_file_encoding="utf-8")
