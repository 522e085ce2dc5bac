"""ShieldScatter - 基于反向散射标签多径签名的物理层认证仿真与实验框架。"""

__version__ = "0.1.0"
