import csv
class Mark(object):
    def __init__(self, marks, fp):
        self._marks = marks
        reader = csv.reader(
            fp,
            delimiter=';'
        )
        for row in reader:
            print(row)
    def key(self):
        return self._marks
    def __lt__(self, other):
        return self.key() < other.key()
with open('some.csv') as csvfile:
    mark1 = Mark(9, csvfile)
    mark2 = Mark(8, csvfile)
print(mark1 < mark2)
