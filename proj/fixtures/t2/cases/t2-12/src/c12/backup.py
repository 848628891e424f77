import subprocess


def archive(user_dir, target):
    cmd = "tar czf " + target + " " + user_dir
    return subprocess.call(cmd, shell=True)


def archive_all(dirs, target_dir):
    return [archive(d, target_dir + "/" + d + ".tgz") for d in dirs]
