"""实验框架与命令行测试。"""
