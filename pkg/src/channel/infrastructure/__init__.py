"""轨迹文件基础设施包。"""
