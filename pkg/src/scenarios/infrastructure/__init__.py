"""场景脚本加载基础设施包。"""
