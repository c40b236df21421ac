import javax.batch.api.BatchProperty;
import javax.batch.runtime.BatchRuntime;
import javax.batch.operations.JobOperator;
class K28b {
    @BatchProperty String chunkSize;
    JobOperator ops = BatchRuntime.getJobOperator();
}
