public class Report {
    public String join(String[] parts) {
        String out = "";
        int i = 0;
        while (i < parts.length) {
            out = out + parts[i];
            out = out + ",";
            i++;
        }
        return out;
    }
}
